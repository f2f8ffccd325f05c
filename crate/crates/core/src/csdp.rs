//! Primal-dual interior-point solver for block-diagonal Hermitian SDPs.
//!
//! Solves
//!
//! ```text
//! (P)  min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X = Diag(X_1, …, X_K) ⪰ 0
//! (D)  max bᵀy     s.t.  Σ y_i A_i + S = C,  S ⪰ 0
//! ```
//!
//! with `⟨H, G⟩ = Re tr(H^H G)`. The search direction is HKM with a Mehrotra
//! predictor-corrector step and a dense Cholesky factorization of the `m × m`
//! Schur complement `M_ij = ⟨A_i, X A_j S⁻¹⟩`.
//!
//! Complex blocks can either be embedded as real symmetric blocks of twice
//! the size through [`realify`] or handled natively. The embedding is a
//! *-homomorphism, so both routes generate the same iterates up to rounding.

use crate::error::{Error, Result};
use crate::tcore::C64;
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Sparse Hermitian block stored as the full list of nonzero entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseHerm {
    pub n: usize,
    /// `(row, col, re, im)`, both triangles present.
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl SparseHerm {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    /// Keeps entries whose modulus exceeds `drop_tol`.
    pub fn from_dense(dense: &DMatrix<C64>, drop_tol: f64) -> Self {
        let n = dense.nrows();
        let mut entries = Vec::new();
        for c in 0..n {
            for r in 0..n {
                let z = dense[(r, c)];
                if z.norm() > drop_tol {
                    entries.push((r, c, z.re, z.im));
                }
            }
        }
        Self { n, entries }
    }

    pub fn from_real_dense(dense: &DMatrix<f64>, drop_tol: f64) -> Self {
        Self::from_dense(&dense.map(|x| C64::new(x, 0.0)), drop_tol)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for &(r, c, re, im) in &self.entries {
            out[(r, c)] += C64::new(re, im);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, re, im)| (r, c, alpha * re, alpha * im))
                .collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, _, re, im)| re * re + im * im)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |a, e| a.max(e.3.abs()))
    }

    /// `Re Σ conj(a_rc) x_rc`.
    pub fn inner_dense(&self, x: &DMatrix<C64>) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, re, im)| {
                let z = x[(r, c)];
                re * z.re + im * z.im
            })
            .sum()
    }

    /// `out += alpha · self`.
    pub fn add_to(&self, out: &mut DMatrix<C64>, alpha: f64) {
        for &(r, c, re, im) in &self.entries {
            out[(r, c)] += C64::new(alpha * re, alpha * im);
        }
    }

    fn hermitian_deviation(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.adjoint())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()))
    }
}

/// Block-diagonal Hermitian SDP in standard primal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsdpProblem {
    pub block_sizes: Vec<usize>,
    /// Blocks restricted to real symmetric matrices.
    pub is_real: Vec<bool>,
    pub c: Vec<SparseHerm>,
    /// `a[i][k]` is block `k` of constraint `i`.
    pub a: Vec<Vec<SparseHerm>>,
    pub b: Vec<f64>,
    /// Reported objectives are `obj_scale · ⟨C, X⟩` and `obj_scale · bᵀy`.
    pub obj_scale: f64,
}

impl CsdpProblem {
    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.block_sizes.len();
        if self.is_real.len() != k || self.c.len() != k {
            return Err(Error::Dimension("block metadata length mismatch".into()));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint operators but {} right-hand sides",
                self.a.len(),
                self.b.len()
            )));
        }
        if self.b.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one constraint is required".into(),
            ));
        }
        let check = |h: &SparseHerm, blk: usize| -> Result<()> {
            if h.n != self.block_sizes[blk] || h.entries.iter().any(|e| e.0 >= h.n || e.1 >= h.n) {
                return Err(Error::Dimension(format!("block {blk} has the wrong size")));
            }
            let scale = 1.0 + h.norm();
            let deviation = h.hermitian_deviation();
            if deviation > 1e-12 * scale {
                return Err(Error::NotHermitian { deviation });
            }
            if self.is_real[blk] && h.max_imag() > 1e-12 * scale {
                return Err(Error::NotHermitian {
                    deviation: h.max_imag(),
                });
            }
            Ok(())
        };
        for (blk, h) in self.c.iter().enumerate() {
            check(h, blk)?;
        }
        for row in &self.a {
            if row.len() != k {
                return Err(Error::Dimension("constraint with wrong block count".into()));
            }
            for (blk, h) in row.iter().enumerate() {
                check(h, blk)?;
            }
        }
        Ok(())
    }

    /// `[⟨A_i, X⟩]_i`.
    pub fn apply(&self, x: &[DMatrix<C64>]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, xk)| a.inner_dense(xk)).sum())
            .collect()
    }

    /// `Σ y_i A_i` blockwise.
    pub fn adjoint(&self, y: &[f64]) -> Vec<DMatrix<C64>> {
        let mut out: Vec<DMatrix<C64>> = self
            .block_sizes
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        for (row, &yi) in self.a.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (a, o) in row.iter().zip(out.iter_mut()) {
                a.add_to(o, yi);
            }
        }
        out
    }

    pub fn objective(&self, x: &[DMatrix<C64>]) -> f64 {
        self.c.iter().zip(x).map(|(c, xk)| c.inner_dense(xk)).sum()
    }

    fn c_dense(&self) -> Vec<DMatrix<C64>> {
        self.c.iter().map(|c| c.to_dense()).collect()
    }

    fn c_norm(&self) -> f64 {
        self.c.iter().map(|c| c.norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Replaces every complex block by its real symmetric embedding, scaling
    /// data by ½ so that inner products are preserved.
    pub fn realified(&self) -> CsdpProblem {
        let embed = |h: &SparseHerm, real: bool| -> SparseHerm {
            if real {
                return h.clone();
            }
            let n = h.n;
            let mut entries = Vec::with_capacity(4 * h.entries.len());
            for &(r, c, re, im) in &h.entries {
                if re != 0.0 {
                    entries.push((r, c, 0.5 * re, 0.0));
                    entries.push((r + n, c + n, 0.5 * re, 0.0));
                }
                if im != 0.0 {
                    entries.push((r, c + n, -0.5 * im, 0.0));
                    entries.push((r + n, c, 0.5 * im, 0.0));
                }
            }
            SparseHerm { n: 2 * n, entries }
        };
        CsdpProblem {
            block_sizes: self
                .block_sizes
                .iter()
                .zip(&self.is_real)
                .map(|(&n, &r)| if r { n } else { 2 * n })
                .collect(),
            is_real: vec![true; self.num_blocks()],
            c: self
                .c
                .iter()
                .zip(&self.is_real)
                .map(|(h, &r)| embed(h, r))
                .collect(),
            a: self
                .a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&self.is_real)
                        .map(|(h, &r)| embed(h, r))
                        .collect()
                })
                .collect(),
            b: self.b.clone(),
            obj_scale: self.obj_scale,
        }
    }
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn realify(h: &DMatrix<C64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Dimension("realify needs a square matrix".into()));
    }
    let deviation = (h - h.adjoint())
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()));
    let scale = 1.0 + h.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if deviation > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

/// `(P₁₁ + P₂₂)/2 + i(P₂₁ − P₁₂)/2`, Hermitian by construction for symmetric `P`.
pub fn derealify(p: &DMatrix<f64>) -> DMatrix<C64> {
    let n = p.nrows() / 2;
    let h = DMatrix::from_fn(n, n, |r, c| {
        C64::new(
            0.5 * (p[(r, c)] + p[(r + n, c + n)]),
            0.5 * (p[(r + n, c)] - p[(r, c + n)]),
        )
    });
    hermitian_part(&h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    InfeasibleSuspected,
    UnboundedSuspected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Embedding {
    /// Embed complex blocks as real symmetric blocks of twice the size.
    Realified,
    /// Work with complex Hermitian blocks directly.
    Native,
    /// Realified for small problems, native once the embedded size grows.
    Auto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Minimum eigenvalue floor used when reporting PSD feasibility.
    pub psd_tol: f64,
    pub step_fraction: f64,
    pub embedding: Embedding,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 100,
            psd_tol: 1e-7,
            step_fraction: 0.98,
            embedding: Embedding::Auto,
            verbose: false,
        }
    }
}

/// Merit, `X`, `Z` and `y` of the best iterate seen so far.
type BestIterate = (f64, Vec<DMatrix<C64>>, Vec<DMatrix<C64>>, DVector<f64>);

/// Embedded dimension above which `Embedding::Auto` switches to native blocks.
const AUTO_NATIVE_DIMENSION: usize = 128;
/// Iterations allowed without a 10% improvement of the convergence merit before giving up.
const LOST_PROGRESS_PATIENCE: usize = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `⟨X, S⟩`.
    pub complementarity: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsdpSolution {
    pub x: Vec<DMatrix<C64>>,
    pub s: Vec<DMatrix<C64>>,
    pub y: Vec<f64>,
    /// `obj_scale · ⟨C, X⟩`.
    pub primal_obj: f64,
    /// `obj_scale · bᵀy`.
    pub dual_obj: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub history: Vec<IterationLog>,
}

/// Independent recomputation of a solution's quality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyReport {
    /// `‖AX − b‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖A*y + S − C‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `primal_obj − dual_obj` (scaled).
    pub gap: f64,
    pub relative_gap: f64,
    pub min_eig_x: f64,
    pub min_eig_s: f64,
}

impl CertifyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.primal_residual <= tol
            && self.dual_residual <= tol
            && self.relative_gap <= tol
            && self.min_eig_x >= -tol
            && self.min_eig_s >= -tol
    }
}

pub fn certify(problem: &CsdpProblem, sol: &CsdpSolution) -> CertifyReport {
    let ax = problem.apply(&sol.x);
    let b_norm = norm2(&problem.b);
    let primal_residual = ax
        .iter()
        .zip(&problem.b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + b_norm);
    let aty = problem.adjoint(&sol.y);
    let mut dual_sq = 0.0;
    for ((aty_k, s_k), c_k) in aty.iter().zip(&sol.s).zip(&problem.c) {
        let mut r = aty_k + s_k;
        c_k.add_to(&mut r, -1.0);
        dual_sq += r.norm_squared();
    }
    let dual_residual = dual_sq.sqrt() / (1.0 + problem.c_norm());
    let primal_obj = problem.obj_scale * problem.objective(&sol.x);
    let dual_obj = problem.obj_scale * dot(&problem.b, &sol.y);
    let gap = primal_obj - dual_obj;
    CertifyReport {
        primal_residual,
        dual_residual,
        primal_obj,
        dual_obj,
        gap,
        relative_gap: gap.abs() / (1.0 + primal_obj.abs() + dual_obj.abs()),
        min_eig_x: min_eigenvalue(&sol.x),
        min_eig_s: min_eigenvalue(&sol.s),
    }
}

/// Smallest eigenvalue over all Hermitian blocks.
pub fn min_eigenvalue(blocks: &[DMatrix<C64>]) -> f64 {
    blocks
        .iter()
        .filter(|b| b.nrows() > 0)
        .map(|b| {
            SymmetricEigen::new(hermitian_part(b))
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, &v| a.min(v))
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn solve(problem: &CsdpProblem, opts: &SolverOptions) -> Result<CsdpSolution> {
    problem.validate()?;
    let embedded: usize = problem
        .block_sizes
        .iter()
        .zip(&problem.is_real)
        .map(|(&n, &r)| if r { n } else { 2 * n })
        .sum();
    let realify_route = match opts.embedding {
        Embedding::Realified => true,
        Embedding::Native => false,
        Embedding::Auto => embedded <= AUTO_NATIVE_DIMENSION,
    };
    if !realify_route || problem.is_real.iter().all(|&r| r) {
        return solve_prepared(problem, opts);
    }
    let real = problem.realified();
    let sol = solve_prepared(&real, opts)?;
    let unembed = |blocks: &[DMatrix<C64>], factor: f64| -> Vec<DMatrix<C64>> {
        blocks
            .iter()
            .zip(&problem.is_real)
            .map(|(b, &r)| {
                if r {
                    b.clone()
                } else {
                    derealify(&b.map(|z| z.re)) * C64::new(factor, 0.0)
                }
            })
            .collect()
    };
    let mut out = CsdpSolution {
        x: unembed(&sol.x, 1.0),
        // S' = ½ R(S), so the Hermitian slack is twice the de-realified block.
        s: unembed(&sol.s, 2.0),
        ..sol
    };
    let report = certify(problem, &out);
    out.primal_obj = report.primal_obj;
    out.dual_obj = report.dual_obj;
    out.primal_residual = report.primal_residual;
    out.dual_residual = report.dual_residual;
    Ok(out)
}

/// Outcome of the constraint-independence analysis.
struct Reduction {
    kept: Vec<usize>,
    infeasible: bool,
}

/// Drops zero and linearly dependent constraints; flags inconsistent ones.
fn analyze_constraints(problem: &CsdpProblem) -> Reduction {
    let m = problem.num_constraints();
    let gram = constraint_gram(problem);
    let max_diag = (0..m).fold(0.0_f64, |a, i| a.max(gram[(i, i)]));
    let tol = 1e-10 * max_diag.max(1e-300);
    // Pivoted Cholesky on the Gram matrix.
    let mut kept: Vec<usize> = Vec::new();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut diag: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    while !remaining.is_empty() {
        let (pos, &piv) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| diag[*a.1].total_cmp(&diag[*b.1]))
            .expect("nonempty");
        if diag[piv] <= tol {
            break;
        }
        remaining.swap_remove(pos);
        let col = kept.len();
        let d = diag[piv].sqrt();
        l[(piv, col)] = d;
        for &r in &remaining {
            let mut v = gram[(r, piv)];
            for c in 0..col {
                v -= l[(r, c)] * l[(piv, c)];
            }
            let v = v / d;
            l[(r, col)] = v;
            diag[r] -= v * v;
        }
        kept.push(piv);
    }
    if remaining.is_empty() {
        kept.sort_unstable();
        return Reduction {
            kept,
            infeasible: false,
        };
    }
    // Consistency of each dropped row: A_r = Σ c_k A_k with G_KK c = G_Kr.
    let kk = kept.len();
    let g_kk = DMatrix::from_fn(kk, kk, |i, j| gram[(kept[i], kept[j])]);
    let mut infeasible = false;
    let b_scale = 1.0 + problem.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let chol = Cholesky::new(g_kk);
    for &r in &remaining {
        let predicted = match &chol {
            Some(ch) if kk > 0 => {
                let rhs = DVector::from_fn(kk, |i, _| gram[(kept[i], r)]);
                let coef = ch.solve(&rhs);
                (0..kk).map(|i| coef[i] * problem.b[kept[i]]).sum::<f64>()
            }
            _ => 0.0,
        };
        if (predicted - problem.b[r]).abs() > 1e-8 * b_scale {
            infeasible = true;
        }
    }
    kept.sort_unstable();
    Reduction { kept, infeasible }
}

/// `G_ij = ⟨A_i, A_j⟩`, accumulated per matrix position.
fn constraint_gram(problem: &CsdpProblem) -> DMatrix<f64> {
    let m = problem.num_constraints();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for (blk, &n) in problem.block_sizes.iter().enumerate() {
        let mut by_pos: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); n * n];
        for (i, row) in problem.a.iter().enumerate() {
            for &(r, c, re, im) in &row[blk].entries {
                by_pos[r + c * n].push((i, re, im));
            }
        }
        for list in &by_pos {
            for (x, &(i, ri, ii)) in list.iter().enumerate() {
                for &(j, rj, ij) in &list[x..] {
                    let v = ri * rj + ii * ij;
                    gram[(i, j)] += v;
                    if i != j {
                        gram[(j, i)] += v;
                    }
                }
            }
        }
    }
    gram
}

fn solve_prepared(problem: &CsdpProblem, opts: &SolverOptions) -> Result<CsdpSolution> {
    let m_full = problem.num_constraints();
    let reduction = analyze_constraints(problem);
    let k = problem.num_blocks();
    if reduction.infeasible || reduction.kept.is_empty() {
        let zero_blocks: Vec<DMatrix<C64>> = problem
            .block_sizes
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        let status = if reduction.infeasible {
            SolveStatus::InfeasibleSuspected
        } else {
            SolveStatus::Optimal
        };
        // With every constraint trivially 0 = 0 the problem is min ⟨C, X⟩ over the cone.
        if status == SolveStatus::Optimal {
            let c = problem.c_dense();
            if min_eigenvalue(&c) < -1e-12 * (1.0 + problem.c_norm()) {
                return Ok(CsdpSolution {
                    x: zero_blocks.clone(),
                    s: c,
                    y: vec![0.0; m_full],
                    primal_obj: f64::NEG_INFINITY,
                    dual_obj: f64::NEG_INFINITY,
                    primal_residual: 0.0,
                    dual_residual: 0.0,
                    iterations: 0,
                    status: SolveStatus::UnboundedSuspected,
                    history: Vec::new(),
                });
            }
            let mut sol = CsdpSolution {
                x: zero_blocks,
                s: c,
                y: vec![0.0; m_full],
                primal_obj: 0.0,
                dual_obj: 0.0,
                primal_residual: 0.0,
                dual_residual: 0.0,
                iterations: 0,
                status,
                history: Vec::new(),
            };
            let rep = certify(problem, &sol);
            sol.primal_residual = rep.primal_residual;
            sol.dual_residual = rep.dual_residual;
            return Ok(sol);
        }
        return Ok(CsdpSolution {
            x: zero_blocks.clone(),
            s: zero_blocks,
            y: vec![0.0; m_full],
            primal_obj: f64::NAN,
            dual_obj: f64::NAN,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            iterations: 0,
            status,
            history: Vec::new(),
        });
    }
    let kept = &reduction.kept;
    let reduced = CsdpProblem {
        block_sizes: problem.block_sizes.clone(),
        is_real: problem.is_real.clone(),
        c: problem.c.clone(),
        a: kept.iter().map(|&i| problem.a[i].clone()).collect(),
        b: kept.iter().map(|&i| problem.b[i]).collect(),
        obj_scale: problem.obj_scale,
    };
    let mut sol = InteriorPoint::new(&reduced, opts).run()?;
    let mut y = vec![0.0; m_full];
    for (pos, &i) in kept.iter().enumerate() {
        y[i] = sol.y[pos];
    }
    sol.y = y;
    debug_assert_eq!(sol.x.len(), k);
    let rep = certify(problem, &sol);
    sol.primal_residual = rep.primal_residual;
    sol.dual_residual = rep.dual_residual;
    Ok(sol)
}

/// Per-block view of the constraints: `(constraint index, block data)`.
struct BlockConstraints {
    n: usize,
    real: bool,
    items: Vec<(usize, SparseHerm)>,
}

struct InteriorPoint<'a> {
    problem: &'a CsdpProblem,
    opts: &'a SolverOptions,
    blocks: Vec<BlockConstraints>,
    c: Vec<DMatrix<C64>>,
    dim: f64,
}

struct Direction {
    dx: Vec<DMatrix<C64>>,
    dy: DVector<f64>,
    dz: Vec<DMatrix<C64>>,
}

impl<'a> InteriorPoint<'a> {
    fn new(problem: &'a CsdpProblem, opts: &'a SolverOptions) -> Self {
        let blocks = (0..problem.num_blocks())
            .map(|blk| BlockConstraints {
                n: problem.block_sizes[blk],
                real: problem.is_real[blk],
                items: problem
                    .a
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| !row[blk].is_empty())
                    .map(|(i, row)| (i, row[blk].clone()))
                    .collect(),
            })
            .collect();
        let dim = problem.block_sizes.iter().sum::<usize>() as f64;
        Self {
            problem,
            opts,
            blocks,
            c: problem.c_dense(),
            dim,
        }
    }

    fn run(&self) -> Result<CsdpSolution> {
        let p = self.problem;
        let m = p.num_constraints();
        let b = DVector::from_vec(p.b.clone());
        let b_norm = b.norm();
        let c_norm = p.c_norm();
        let a_max =
            p.a.iter()
                .map(|row| row.iter().map(|h| h.norm().powi(2)).sum::<f64>().sqrt())
                .fold(0.0_f64, f64::max);
        let b_inf = b.amax();
        let tau = 1.0 + b_inf.max(a_max).max(c_norm);

        let mut x: Vec<DMatrix<C64>> = p
            .block_sizes
            .iter()
            .map(|&n| DMatrix::identity(n, n) * C64::new(tau, 0.0))
            .collect();
        let mut z = x.clone();
        let mut y = DVector::<f64>::zeros(m);
        let mut history = Vec::new();
        let mut status = SolveStatus::MaxIter;
        let mut stalls = 0;
        let mut iterations = 0;
        let mut best: Option<BestIterate> = None;
        let mut since_best = 0;

        for iter in 0..=self.opts.max_iter {
            let ax = DVector::from_vec(p.apply(&x));
            let rp = &b - &ax;
            let aty = p.adjoint(y.as_slice());
            let rd: Vec<DMatrix<C64>> = self
                .c
                .iter()
                .zip(&aty)
                .zip(&z)
                .map(|((c, a), zk)| c - a - zk)
                .collect();
            let pobj = p.objective(&x);
            let dobj = b.dot(&y);
            let xz: f64 = x.iter().zip(&z).map(|(a, bz)| inner(a, bz)).sum();
            let pres = rp.norm() / (1.0 + b_norm);
            let dres = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + c_norm);
            let denom = 1.0 + pobj.abs() + dobj.abs();
            let rel_gap = (xz.abs()).max((pobj - dobj).abs()) / denom;
            let log = IterationLog {
                iteration: iter,
                primal_obj: p.obj_scale * pobj,
                dual_obj: p.obj_scale * dobj,
                complementarity: xz,
                primal_residual: pres,
                dual_residual: dres,
                step_primal: history.last().map_or(0.0, |l: &IterationLog| l.step_primal),
                step_dual: history.last().map_or(0.0, |l: &IterationLog| l.step_dual),
            };
            if self.opts.verbose {
                eprintln!(
                    "{:3} pobj {:+.9e} dobj {:+.9e} gap {:.2e} pres {:.2e} dres {:.2e}",
                    iter, log.primal_obj, log.dual_obj, rel_gap, pres, dres
                );
            }
            iterations = iter;
            let merit = (rel_gap / self.opts.gap_tol)
                .max(pres / self.opts.feas_tol)
                .max(dres / self.opts.feas_tol);
            if best.as_ref().is_none_or(|b| merit < 0.9 * b.0) {
                best = Some((merit, x.clone(), z.clone(), y.clone()));
                since_best = 0;
            } else {
                since_best += 1;
            }
            if rel_gap <= self.opts.gap_tol
                && pres <= self.opts.feas_tol
                && dres <= self.opts.feas_tol
            {
                history.push(log);
                status = SolveStatus::Optimal;
                break;
            }
            let x_norm = x.iter().map(|a| a.norm_squared()).sum::<f64>().sqrt();
            if dobj > 1e10 * (1.0 + c_norm) && dres < 1e-3 {
                history.push(log);
                status = SolveStatus::InfeasibleSuspected;
                break;
            }
            if pobj < -1e10 * (1.0 + b_norm) || (x_norm > 1e12 && pres < 1e-3) {
                history.push(log);
                status = SolveStatus::UnboundedSuspected;
                break;
            }
            // Near a degenerate face the residuals can drift upward while μ keeps shrinking;
            // once several iterations pass without progress the best iterate is returned.
            if iter == self.opts.max_iter || since_best >= LOST_PROGRESS_PATIENCE {
                history.push(log);
                break;
            }

            let mu = xz / self.dim;
            let z_inv: Vec<DMatrix<C64>> = z
                .iter()
                .zip(&self.blocks)
                .map(|(zk, blk)| hermitian_inverse(zk, blk.real))
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::Degenerate {
                    condition: f64::INFINITY,
                })?;
            let schur = self.schur_complement(&x, &z_inv);
            let factor = match factorize(&schur) {
                Some(f) => f,
                None if iter > 0 => {
                    history.push(log);
                    break;
                }
                None => {
                    return Err(Error::Degenerate {
                        condition: diag_condition(&schur),
                    })
                }
            };

            // Predictor.
            let rc_aff: Vec<DMatrix<C64>> = x.iter().map(|xk| -xk).collect();
            let aff = self.direction(&factor, &x, &z_inv, &rp, &rd, &rc_aff);
            let ap_aff = self.step_length(&x, &aff.dx);
            let ad_aff = self.step_length(&z, &aff.dz);
            let mu_aff: f64 = x
                .iter()
                .zip(&aff.dx)
                .zip(z.iter().zip(&aff.dz))
                .map(|((xk, dxk), (zk, dzk))| {
                    inner(
                        &(xk + dxk * C64::new(ap_aff, 0.0)),
                        &(zk + dzk * C64::new(ad_aff, 0.0)),
                    )
                })
                .sum::<f64>()
                / self.dim;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector.
            let rc: Vec<DMatrix<C64>> = (0..x.len())
                .map(|k| {
                    let blk = &self.blocks[k];
                    let second = matmul(
                        &matmul(&aff.dx[k], &aff.dz[k], blk.real),
                        &z_inv[k],
                        blk.real,
                    );
                    &z_inv[k] * C64::new(sigma * mu, 0.0) - &x[k] - second
                })
                .collect();
            let dir = self.direction(&factor, &x, &z_inv, &rp, &rd, &rc);
            let gamma = self.opts.step_fraction;
            let ap = (gamma * self.step_length(&x, &dir.dx)).min(1.0);
            let ad = (gamma * self.step_length(&z, &dir.dz)).min(1.0);
            let ap = self.backtrack(&x, &dir.dx, ap);
            let ad = self.backtrack(&z, &dir.dz, ad);

            for k in 0..x.len() {
                let real = self.blocks[k].real;
                x[k] = pin(
                    hermitian_part(&(&x[k] + &dir.dx[k] * C64::new(ap, 0.0))),
                    real,
                );
                z[k] = pin(
                    hermitian_part(&(&z[k] + &dir.dz[k] * C64::new(ad, 0.0))),
                    real,
                );
            }
            y += &dir.dy * ad;
            history.push(IterationLog {
                step_primal: ap,
                step_dual: ad,
                ..log
            });
            if ap < 1e-8 && ad < 1e-8 {
                stalls += 1;
                if stalls >= 3 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }

        if status == SolveStatus::MaxIter {
            if let Some((_, bx, bz, by)) = best {
                x = bx;
                z = bz;
                y = by;
            }
        }
        let pobj = p.objective(&x);
        let dobj = b.dot(&y);
        let ax = DVector::from_vec(p.apply(&x));
        let aty = p.adjoint(y.as_slice());
        let dres = self
            .c
            .iter()
            .zip(&aty)
            .zip(&z)
            .map(|((c, a), zk)| (c - a - zk).norm_squared())
            .sum::<f64>()
            .sqrt()
            / (1.0 + c_norm);
        Ok(CsdpSolution {
            x,
            s: z,
            y: y.as_slice().to_vec(),
            primal_obj: p.obj_scale * pobj,
            dual_obj: p.obj_scale * dobj,
            primal_residual: (&b - ax).norm() / (1.0 + b_norm),
            dual_residual: dres,
            iterations,
            status,
            history,
        })
    }

    /// `M_ij = ⟨A_i, X A_j Z⁻¹⟩`, summed over blocks.
    fn schur_complement(&self, x: &[DMatrix<C64>], z_inv: &[DMatrix<C64>]) -> DMatrix<f64> {
        let m = self.problem.num_constraints();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for (k, blk) in self.blocks.iter().enumerate() {
            let n = blk.n;
            if blk.real {
                let xr = x[k].map(|v| v.re);
                let zr = z_inv[k].map(|v| v.re);
                for (pos_j, (j, aj)) in blk.items.iter().enumerate() {
                    // T = A_j Z⁻¹, G = X T.
                    let mut t = DMatrix::<f64>::zeros(n, n);
                    for &(r, c, re, _) in &aj.entries {
                        for col in 0..n {
                            t[(r, col)] += re * zr[(c, col)];
                        }
                    }
                    let g = &xr * t;
                    let gs = g.as_slice();
                    for (i, ai) in &blk.items[..=pos_j] {
                        let mut acc = 0.0;
                        for &(r, c, re, _) in &ai.entries {
                            acc += re * gs[c + r * n];
                        }
                        schur[(*i, *j)] += acc;
                    }
                }
            } else {
                for (pos_j, (j, aj)) in blk.items.iter().enumerate() {
                    let mut t = DMatrix::<C64>::zeros(n, n);
                    for &(r, c, re, im) in &aj.entries {
                        let v = C64::new(re, im);
                        for col in 0..n {
                            t[(r, col)] += v * z_inv[k][(c, col)];
                        }
                    }
                    let g = &x[k] * t;
                    let gs = g.as_slice();
                    for (i, ai) in &blk.items[..=pos_j] {
                        let mut acc = 0.0;
                        for &(r, c, re, im) in &ai.entries {
                            // Re(a_rc · g_cr)
                            let gv = gs[c + r * n];
                            acc += re * gv.re - im * gv.im;
                        }
                        schur[(*i, *j)] += acc;
                    }
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                schur[(j, i)] = schur[(i, j)];
            }
        }
        schur
    }

    /// Solves the Newton system for a given complementarity target `rc`:
    /// `dX = rc − X dZ Z⁻¹`, `dZ = rd − A*dy`, `A dX = rp`.
    fn direction(
        &self,
        factor: &Cholesky<f64, nalgebra::Dyn>,
        x: &[DMatrix<C64>],
        z_inv: &[DMatrix<C64>],
        rp: &DVector<f64>,
        rd: &[DMatrix<C64>],
        rc: &[DMatrix<C64>],
    ) -> Direction {
        let p = self.problem;
        let h: Vec<DMatrix<C64>> = (0..x.len())
            .map(|k| {
                let real = self.blocks[k].real;
                &rc[k] - matmul(&matmul(&x[k], &rd[k], real), &z_inv[k], real)
            })
            .collect();
        let ah = DVector::from_vec(p.apply(&h));
        let dy = factor.solve(&(rp - ah));
        let aty = p.adjoint(dy.as_slice());
        let dz: Vec<DMatrix<C64>> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
        let dx = (0..x.len())
            .map(|k| {
                let real = self.blocks[k].real;
                let v = &rc[k] - matmul(&matmul(&x[k], &dz[k], real), &z_inv[k], real);
                pin(hermitian_part(&v), real)
            })
            .collect();
        Direction { dx, dy, dz }
    }

    /// Largest `α ≤ 1/γ` keeping `X + α dX ⪰ 0` (returned unscaled, capped at 1e6).
    fn step_length(&self, x: &[DMatrix<C64>], dx: &[DMatrix<C64>]) -> f64 {
        let mut alpha = f64::INFINITY;
        for (k, (xk, dxk)) in x.iter().zip(dx).enumerate() {
            if xk.nrows() == 0 {
                continue;
            }
            let lam = if self.blocks[k].real {
                let xr = xk.map(|v| v.re);
                let dr = dxk.map(|v| v.re);
                match Cholesky::new(xr) {
                    Some(ch) => {
                        let l = ch.l();
                        let w = l.solve_lower_triangular(&dr).unwrap_or(dr.clone());
                        let w = l
                            .solve_lower_triangular(&w.transpose())
                            .unwrap_or(w.transpose());
                        let w = (&w + w.transpose()) * 0.5;
                        SymmetricEigen::new(w).eigenvalues.min()
                    }
                    None => return 0.0,
                }
            } else {
                match Cholesky::new(hermitian_part(xk)) {
                    Some(ch) => {
                        let l = ch.l();
                        let w = l.solve_lower_triangular(dxk).unwrap_or(dxk.clone());
                        let w = l
                            .solve_lower_triangular(&w.adjoint())
                            .unwrap_or(w.adjoint());
                        SymmetricEigen::new(hermitian_part(&w)).eigenvalues.min()
                    }
                    None => return 0.0,
                }
            };
            if lam < 0.0 {
                alpha = alpha.min(-1.0 / lam);
            }
        }
        alpha.min(1e6)
    }

    /// Shrinks `alpha` until every block of `X + α dX` admits a Cholesky factor.
    fn backtrack(&self, x: &[DMatrix<C64>], dx: &[DMatrix<C64>], mut alpha: f64) -> f64 {
        for _ in 0..30 {
            let ok = x.iter().zip(dx).enumerate().all(|(k, (xk, dxk))| {
                let trial = hermitian_part(&(xk + dxk * C64::new(alpha, 0.0)));
                if self.blocks[k].real {
                    Cholesky::new(trial.map(|v| v.re)).is_some()
                } else {
                    Cholesky::new(trial).is_some()
                }
            });
            if ok {
                return alpha;
            }
            alpha *= 0.8;
        }
        0.0
    }
}

fn factorize(schur: &DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(ch) = Cholesky::new(schur.clone()) {
        return Some(ch);
    }
    let m = schur.nrows();
    let max_diag = (0..m).fold(0.0_f64, |a, i| a.max(schur[(i, i)].abs()));
    for delta in [1e-14, 1e-12, 1e-10, 1e-8] {
        let mut reg = schur.clone();
        for i in 0..m {
            reg[(i, i)] += delta * max_diag;
        }
        if let Some(ch) = Cholesky::new(reg) {
            return Some(ch);
        }
    }
    None
}

fn diag_condition(m: &DMatrix<f64>) -> f64 {
    let d = m.diagonal();
    let max = d.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = d.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn hermitian_inverse(z: &DMatrix<C64>, real: bool) -> Option<DMatrix<C64>> {
    if z.nrows() == 0 {
        return Some(z.clone());
    }
    if real {
        let inv = Cholesky::new(z.map(|v| v.re))?.inverse();
        Some(inv.map(|v| C64::new(v, 0.0)))
    } else {
        Some(hermitian_part(&Cholesky::new(hermitian_part(z))?.inverse()))
    }
}

fn matmul(a: &DMatrix<C64>, b: &DMatrix<C64>, real: bool) -> DMatrix<C64> {
    if real {
        (a.map(|v| v.re) * b.map(|v| v.re)).map(|v| C64::new(v, 0.0))
    } else {
        a * b
    }
}

fn pin(mut h: DMatrix<C64>, real: bool) -> DMatrix<C64> {
    if real {
        h.iter_mut().for_each(|z| z.im = 0.0);
    }
    h
}

pub(crate) fn hermitian_part(h: &DMatrix<C64>) -> DMatrix<C64> {
    (h + h.adjoint()) * C64::new(0.5, 0.0)
}

/// `Re tr(A^H B)`.
pub(crate) fn inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(u, v)| u.re * v.re + u.im * v.im)
        .sum()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real_block(m: DMatrix<f64>) -> SparseHerm {
        SparseHerm::from_real_dense(&m, 0.0)
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        hermitian_part(&g)
    }

    #[test]
    fn realify_real_matrix_duplicates() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]).map(|x| C64::new(x, 0.0));
        let r = realify(&h).unwrap();
        assert_eq!(r.view((0, 0), (2, 2)), r.view((2, 2), (2, 2)));
        assert!(r.view((0, 2), (2, 2)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn realify_eigenvalues_of_imaginary_offdiagonal() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 0.0),
            ],
        );
        let r = realify(&h).unwrap();
        let mut eig: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn realify_halves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let lhs = inner(&a, &b);
        let rhs = 0.5 * realify(&a).unwrap().dot(&realify(&b).unwrap());
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(realify(&DMatrix::from_element(2, 2, C64::new(0.0, 1.0))).is_err());
        assert!((derealify(&realify(&a).unwrap()) - &a)
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    fn trace_problem(n: usize) -> CsdpProblem {
        CsdpProblem {
            block_sizes: vec![n],
            is_real: vec![true],
            c: vec![real_block(DMatrix::identity(n, n))],
            a: vec![vec![real_block(DMatrix::identity(n, n))]],
            b: vec![1.0],
            obj_scale: 1.0,
        }
    }

    #[test]
    fn trace_constraint_optimum() {
        let p = trace_problem(3);
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_obj - 1.0).abs() < 1e-7);
        assert!(certify(&p, &sol).passes(1e-7));
    }

    #[test]
    fn diagonal_problem_matches_lp_vertex_enumeration() {
        // min c·x  s.t. A x = b, x ≥ 0 encoded on the diagonal.
        let c = [1.0, 2.0, 0.5, 3.0];
        let a = [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 2.0, 0.0]];
        let b = [2.0, 1.0];
        let diag = |v: &[f64]| real_block(DMatrix::from_diagonal(&DVector::from_row_slice(v)));
        let prob = CsdpProblem {
            block_sizes: vec![4],
            is_real: vec![true],
            c: vec![diag(&c)],
            a: a.iter().map(|row| vec![diag(row)]).collect(),
            b: b.to_vec(),
            obj_scale: 1.0,
        };
        // LP oracle: enumerate basic feasible solutions.
        let mut best = f64::INFINITY;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let m = nalgebra::Matrix2::new(a[0][i], a[0][j], a[1][i], a[1][j]);
                if let Some(inv) = m.try_inverse() {
                    let xb = inv * nalgebra::Vector2::new(b[0], b[1]);
                    if xb[0] >= -1e-12 && xb[1] >= -1e-12 {
                        best = best.min(c[i] * xb[0] + c[j] * xb[1]);
                    }
                }
            }
        }
        let sol = solve(&prob, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(
            (sol.primal_obj - best).abs() < 1e-7,
            "{} vs {}",
            sol.primal_obj,
            best
        );
    }

    #[test]
    fn zero_constraint_zero_problem() {
        let p = CsdpProblem {
            block_sizes: vec![2],
            is_real: vec![true],
            c: vec![SparseHerm::zeros(2)],
            a: vec![vec![SparseHerm::zeros(2)]],
            b: vec![0.0],
            obj_scale: 1.0,
        };
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.primal_obj, 0.0);
        let mut bad = p.clone();
        bad.b[0] = 1.0;
        assert_eq!(
            solve(&bad, &SolverOptions::default()).unwrap().status,
            SolveStatus::InfeasibleSuspected
        );
    }

    #[test]
    fn corrupted_solution_fails_certification() {
        let p = trace_problem(2);
        let mut sol = solve(&p, &SolverOptions::default()).unwrap();
        assert!(certify(&p, &sol).passes(1e-7));
        sol.x[0][(0, 0)] += C64::new(0.1, 0.0);
        assert!(certify(&p, &sol).primal_residual > 1e-3);
    }

    fn random_complex_problem(rng: &mut impl Rng) -> (CsdpProblem, f64) {
        // Known optimal pair: X* = V1 V1^H, S* = V2 V2^H with orthogonal ranges.
        let n = 3;
        let m = 4;
        let q = SymmetricEigen::new(random_hermitian(n, rng)).eigenvectors;
        let x_star = {
            let v = q.columns(0, 1);
            v * v.adjoint() * C64::new(2.0, 0.0)
        };
        let s_star = {
            let v = q.columns(1, 2);
            v * v.adjoint()
        };
        let a: Vec<DMatrix<C64>> = (0..m).map(|_| random_hermitian(n, rng)).collect();
        let y_star: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut c = s_star.clone();
        for (ai, yi) in a.iter().zip(&y_star) {
            c += ai * C64::new(*yi, 0.0);
        }
        let b: Vec<f64> = a.iter().map(|ai| inner(ai, &x_star)).collect();
        let opt = inner(&c, &x_star);
        let prob = CsdpProblem {
            block_sizes: vec![n],
            is_real: vec![false],
            c: vec![SparseHerm::from_dense(&c, 0.0)],
            a: a.iter()
                .map(|ai| vec![SparseHerm::from_dense(ai, 0.0)])
                .collect(),
            b,
            obj_scale: 1.0,
        };
        (prob, opt)
    }

    #[test]
    fn embeddings_agree_on_complex_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (prob, opt) = random_complex_problem(&mut rng);
        for embedding in [Embedding::Realified, Embedding::Native] {
            let opts = SolverOptions {
                embedding,
                ..SolverOptions::default()
            };
            let sol = solve(&prob, &opts).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal, "{embedding:?}");
            assert!((sol.primal_obj - opt).abs() < 1e-6, "{embedding:?}");
            assert!(certify(&prob, &sol).passes(1e-7), "{embedding:?}");
        }
    }

    #[test]
    fn dependent_constraints_are_dropped() {
        let mut p = trace_problem(2);
        p.a.push(vec![real_block(DMatrix::identity(2, 2) * 2.0)]);
        p.b.push(2.0);
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_obj - 1.0).abs() < 1e-7);
        p.b[1] = 3.0;
        assert_eq!(
            solve(&p, &SolverOptions::default()).unwrap().status,
            SolveStatus::InfeasibleSuspected
        );
    }

    #[test]
    fn deterministic_iterates() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (prob, _) = random_complex_problem(&mut rng);
        let a = solve(&prob, &SolverOptions::default()).unwrap();
        let b = solve(&prob, &SolverOptions::default()).unwrap();
        assert_eq!(a.y, b.y);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn json_schema_round_trip() {
        let p = trace_problem(2);
        let text = serde_json::to_string(&p).unwrap();
        let back: CsdpProblem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
