//! Applications of tensor SDPs: sum-of-squares lower bounds for polynomials,
//! T-eigenvalue and norm minimization, integer quartic relaxations, and the
//! direct spectral oracles used to check them.
//!
//! # Sum of squares with a Gram tensor
//!
//! Let `x` be the monomial basis of degree `≤ d` (size `N`) and `N = m·p`.
//! Folding `x` into an `m × 1 × p` tensor `[X]` gives
//! `[X] ∗ [X]ᵀ = C + Σ_α A_α x^α`. Any T-PSD `X` then yields
//! `⟨X, [X] ∗ [X]ᵀ⟩ ≥ 0`, so `f − γ` has a Gram tensor whenever
//! `⟨A_α, X⟩ = f_α` for every `α ≠ 0` and `⟨C, X⟩ = f_0 − γ`. Minimizing
//! `⟨C, X⟩` therefore gives the best bound `γ = f_0 − min ⟨C, X⟩`. With
//! `p = 1` this is the classical Gram-matrix relaxation, and since
//! `xᵀ bcirc(X) x = ⟨X, [X] ∗ [X]ᵀ⟩`, the tensor relaxation is the classical
//! one restricted to block-circulant Gram matrices.

use crate::csdp::{SolveStatus, SolverOptions};
use crate::error::{Error, Result};
use crate::spectral::{require_symmetric, t_eigenvalues};
use crate::tcore::{fourier_blocks, identity, inner, tprod, Tensor3};
use crate::tsdp::{solve_tsdp, TsdpProblem, TsdpSolution};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

pub type Exponent = Vec<u32>;

/// Real polynomial in `n` variables, stored as exponent → coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub n: usize,
    terms: BTreeMap<Exponent, f64>,
}

/// Line number, `(variable, power)` factors and coefficient of a parsed term.
type RawTerm = (usize, Vec<(usize, u32)>, f64);

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_terms(n, [(vec![0; n], c)])
    }

    /// The variable `x_{i+1}` (zero-based `i`).
    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::from_terms(n, [(e, 1.0)])
    }

    pub fn monomial(exponent: Exponent, coeff: f64) -> Self {
        let n = exponent.len();
        Self::from_terms(n, [(exponent, coeff)])
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exponent, f64)>) -> Self {
        let mut out = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length must equal the variable count");
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: f64) {
        let entry = self.terms.entry(e.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * monomial_value(e, x))
            .sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_terms(
            self.n,
            self.terms.iter().map(|(e, &c)| (e.clone(), alpha * c)),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, &c)| (e.clone(), c)),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Parses one term per line: `coeff x1^a1 x2^a2 …`.
    ///
    /// The coefficient may be omitted (meaning 1) and a term without
    /// variables is a constant. `*` may separate factors, `x3` means `x3^1`,
    /// `#` starts a comment and `vars N` fixes the variable count, which
    /// otherwise is the largest variable index used.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut raw: Vec<RawTerm> = Vec::new();
        for (idx, full_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = full_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix("vars") {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(format!("invalid variable count '{}'", rest.trim())))?;
                if n == 0 {
                    return Err(err("variable count must be positive".into()));
                }
                declared = Some(n);
                continue;
            }
            let mut tokens = line
                .split(|c: char| c.is_whitespace() || c == '*')
                .filter(|t| !t.is_empty())
                .peekable();
            let mut coeff = 1.0;
            if let Some(first) = tokens.peek() {
                if !first.starts_with('x') && !first.starts_with("-x") && !first.starts_with("+x") {
                    coeff = first
                        .parse::<f64>()
                        .map_err(|_| err(format!("invalid coefficient '{first}'")))?;
                    if !coeff.is_finite() {
                        return Err(err("coefficient is not finite".into()));
                    }
                    tokens.next();
                }
            }
            let mut factors = Vec::new();
            for tok in tokens {
                let (sign, tok) = match tok.strip_prefix('-') {
                    Some(t) => (-1.0, t),
                    None => (1.0, tok.strip_prefix('+').unwrap_or(tok)),
                };
                coeff *= sign;
                let body = tok
                    .strip_prefix('x')
                    .ok_or_else(|| err(format!("expected a variable like x1^2, found '{tok}'")))?;
                let (var, pow) = match body.split_once('^') {
                    Some((v, e)) => (v, e),
                    None => (body, "1"),
                };
                let var: usize = var
                    .parse()
                    .map_err(|_| err(format!("invalid variable index in '{tok}'")))?;
                if var == 0 {
                    return Err(err("variables are numbered from x1".into()));
                }
                let pow: u32 = pow
                    .parse()
                    .map_err(|_| err(format!("invalid exponent in '{tok}'")))?;
                factors.push((var, pow));
            }
            raw.push((line_no, factors, coeff));
        }
        let used = raw
            .iter()
            .flat_map(|(_, f, _)| f.iter().map(|&(v, _)| v))
            .max()
            .unwrap_or(1);
        let n = match declared {
            Some(n) if used > n => {
                let line = raw
                    .iter()
                    .find(|(_, f, _)| f.iter().any(|&(v, _)| v > n))
                    .map_or(0, |r| r.0);
                return Err(Error::Parse {
                    line,
                    message: format!("variable x{used} exceeds the declared count {n}"),
                });
            }
            Some(n) => n,
            None => used,
        };
        let mut poly = Self::zero(n);
        for (_, factors, coeff) in raw {
            let mut e = vec![0u32; n];
            for (v, pow) in factors {
                e[v - 1] += pow;
            }
            poly.add_term(e, coeff);
        }
        Ok(poly)
    }

    /// Text form readable by [`Polynomial::parse`], terms in graded order.
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.n);
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| graded_cmp(a.0, b.0));
        for (e, c) in terms {
            out.push_str(&format!("{c}"));
            for (i, &a) in e.iter().enumerate() {
                if a > 0 {
                    out.push_str(&format!(" x{}^{}", i + 1, a));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn monomial_value(e: &[u32], x: &[f64]) -> f64 {
    e.iter().zip(x).map(|(&a, &v)| v.powi(a as i32)).product()
}

/// Graded order (by total degree) with descending lex order within a degree.
fn graded_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// All monomials of degree `≤ d` in `n` variables:
/// `1, x1, …, xn, x1², x1x2, …` (graded, descending lex within a degree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialBasis {
    pub n: usize,
    pub d: usize,
    pub exponents: Vec<Exponent>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|e| monomial_value(e, x))
            .collect()
    }
}

pub fn monomial_basis(n: usize, d: usize) -> MonomialBasis {
    fn fill(rest: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if rest == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=total).rev() {
            prefix.push(a);
            fill(rest - 1, total - a, prefix, out);
            prefix.pop();
        }
    }
    let mut exponents = Vec::new();
    for t in 0..=d as u32 {
        fill(n, t, &mut Vec::with_capacity(n), &mut exponents);
    }
    MonomialBasis { n, d, exponents }
}

pub fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// One nonzero of a sparse coefficient tensor: `(i, j, k, value)`.
pub type SparseEntry = (usize, usize, usize, f64);

/// Gram identity `[x]_d [x]_dᵀ = C + Σ_α A_α x^α` with sparse `A_α`.
#[derive(Debug, Clone)]
pub struct GramDataSdp {
    pub basis: MonomialBasis,
    /// Exponents `α ≠ 0` of degree `≤ 2d`, in graded order.
    pub alphas: Vec<Exponent>,
    /// `(row, col, multiplicity)` for the constant monomial.
    pub c: Vec<(usize, usize, f64)>,
    pub a: Vec<Vec<(usize, usize, f64)>>,
}

impl GramDataSdp {
    pub fn c_dense(&self) -> DMatrix<f64> {
        dense_matrix(self.basis.len(), &self.c)
    }

    pub fn a_dense(&self, idx: usize) -> DMatrix<f64> {
        dense_matrix(self.basis.len(), &self.a[idx])
    }

    /// `C + Σ_α A_α x^α` at a numeric point.
    pub fn evaluate(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = self.c_dense();
        for (alpha, entries) in self.alphas.iter().zip(&self.a) {
            let v = monomial_value(alpha, x);
            for &(r, c, w) in entries {
                out[(r, c)] += w * v;
            }
        }
        out
    }
}

fn dense_matrix(n: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(r, c, w) in entries {
        m[(r, c)] += w;
    }
    m
}

/// Gram identity `[X]_d ∗ [X]_dᵀ = C + Σ_α A_α x^α` with `[X]_d` the basis
/// folded into an `m × 1 × p` tensor.
#[derive(Debug, Clone)]
pub struct GramDataTsdp {
    pub basis: MonomialBasis,
    pub m: usize,
    pub p: usize,
    pub alphas: Vec<Exponent>,
    pub c: Vec<SparseEntry>,
    pub a: Vec<Vec<SparseEntry>>,
}

impl GramDataTsdp {
    fn dense(&self, entries: &[SparseEntry]) -> Tensor3 {
        let mut t = Tensor3::zeros(self.m, self.m, self.p);
        for &(i, j, k, w) in entries {
            t.set(i, j, k, t.get(i, j, k) + w);
        }
        t
    }

    pub fn c_dense(&self) -> Tensor3 {
        self.dense(&self.c)
    }

    pub fn a_dense(&self, idx: usize) -> Tensor3 {
        self.dense(&self.a[idx])
    }

    /// `[X]_d` at a numeric point.
    pub fn folded_basis(&self, x: &[f64]) -> Tensor3 {
        let v = self.basis.evaluate(x);
        Tensor3::from_fn(self.m, 1, self.p, |i, _, k| v[k * self.m + i])
    }

    pub fn evaluate(&self, x: &[f64]) -> Tensor3 {
        let mut entries = self.c.clone();
        for (alpha, list) in self.alphas.iter().zip(&self.a) {
            let v = monomial_value(alpha, x);
            entries.extend(list.iter().map(|&(i, j, k, w)| (i, j, k, w * v)));
        }
        self.dense(&entries)
    }
}

/// Exponents `α ≠ 0` with `|α| ≤ 2d` and their positions.
fn alpha_index(n: usize, d: usize) -> (Vec<Exponent>, HashMap<Exponent, usize>) {
    let alphas: Vec<Exponent> = monomial_basis(n, 2 * d)
        .exponents
        .into_iter()
        .skip(1)
        .collect();
    let index = alphas
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    (alphas, index)
}

fn half_degree(f: &Polynomial) -> Result<usize> {
    let deg = f.degree();
    if deg % 2 == 1 {
        return Err(Error::OddDegree(deg));
    }
    Ok(deg / 2)
}

/// Classical Gram data and `b = (f_α)_{α ≠ 0}`.
pub fn build_sdp_data(f: &Polynomial) -> Result<(GramDataSdp, Vec<f64>)> {
    let d = half_degree(f)?;
    let basis = monomial_basis(f.n, d);
    let (alphas, index) = alpha_index(f.n, d);
    let mut c = Vec::new();
    let mut a = vec![Vec::new(); alphas.len()];
    for (r, er) in basis.exponents.iter().enumerate() {
        for (col, ec) in basis.exponents.iter().enumerate() {
            let sum: Exponent = er.iter().zip(ec).map(|(x, y)| x + y).collect();
            match index.get(&sum) {
                Some(&i) => a[i].push((r, col, 1.0)),
                None => c.push((r, col, 1.0)),
            }
        }
    }
    let b = alphas.iter().map(|al| f.coefficient(al)).collect();
    Ok((
        GramDataSdp {
            basis,
            alphas,
            c,
            a,
        },
        b,
    ))
}

/// Quality of a user-supplied Gram matrix as a certificate for the `p = 1` relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramCertificate {
    /// `max_α |⟨A_α, G⟩ − f_α|`.
    pub max_residual: f64,
    pub min_eigenvalue: f64,
    /// `⟨C, G⟩`.
    pub objective: f64,
    /// `f_0 − ⟨C, G⟩`, the lower bound certified when `G` is feasible.
    pub bound: f64,
}

impl GramCertificate {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.max_residual <= tol && self.min_eigenvalue >= -tol
    }
}

/// Evaluates `G` against the classical Gram constraints of `f`.
pub fn check_gram_certificate(f: &Polynomial, gram: &DMatrix<f64>) -> Result<GramCertificate> {
    let (data, b) = build_sdp_data(f)?;
    let size = data.basis.len();
    if gram.shape() != (size, size) {
        return Err(Error::Dimension(format!(
            "Gram matrix must be {size}×{size}, found {:?}",
            gram.shape()
        )));
    }
    let apply = |entries: &[(usize, usize, f64)]| {
        entries
            .iter()
            .map(|&(r, c, w)| w * gram[(r, c)])
            .sum::<f64>()
    };
    let max_residual = data
        .a
        .iter()
        .zip(&b)
        .map(|(entries, &fa)| (apply(entries) - fa).abs())
        .fold(0.0, f64::max);
    let sym = (gram + gram.transpose()) * 0.5;
    let min_eigenvalue = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let objective = apply(&data.c);
    Ok(GramCertificate {
        max_residual,
        min_eigenvalue,
        objective,
        bound: f.coefficient(&vec![0; f.n]) - objective,
    })
}

/// Tensor Gram data and the corresponding standard-form problem.
pub fn build_tsdp_data(f: &Polynomial, p: usize) -> Result<(GramDataTsdp, TsdpProblem)> {
    let d = half_degree(f)?;
    let basis = monomial_basis(f.n, d);
    let size = basis.len();
    if p == 0 || !size.is_multiple_of(p) {
        return Err(Error::InvalidTubeSize {
            p,
            size,
            divisors: divisors(size),
        });
    }
    let m = size / p;
    let (alphas, index) = alpha_index(f.n, d);
    let mut c = Vec::new();
    let mut a: Vec<Vec<SparseEntry>> = vec![Vec::new(); alphas.len()];
    // Entry (i, j, k) of [X] ∗ [X]ᵀ is Σ_l x[l·m + i] · x[((l − k) mod p)·m + j].
    for k in 0..p {
        for l in 0..p {
            let lc = (l + p - k) % p;
            for i in 0..m {
                let er = &basis.exponents[l * m + i];
                for j in 0..m {
                    let ec = &basis.exponents[lc * m + j];
                    let sum: Exponent = er.iter().zip(ec).map(|(x, y)| x + y).collect();
                    match index.get(&sum) {
                        Some(&idx) => a[idx].push((i, j, k, 1.0)),
                        None => c.push((i, j, k, 1.0)),
                    }
                }
            }
        }
    }
    let data = GramDataTsdp {
        basis,
        m,
        p,
        alphas,
        c,
        a,
    };
    let b = data.alphas.iter().map(|al| f.coefficient(al)).collect();
    let problem = TsdpProblem::new(
        data.c_dense(),
        (0..data.a.len()).map(|i| data.a_dense(i)).collect(),
        b,
    )?;
    Ok((data, problem))
}

/// Outcome of an SOS relaxation with problem sizes and timings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SosReport {
    /// Certified lower bound `f_0 − ⟨C, X⟩`; `−∞` when the relaxation is infeasible.
    pub bound: f64,
    pub p: usize,
    pub basis_size: usize,
    /// Side length `m = N / p` of the tensor variable.
    pub block_size: usize,
    /// Number of Hermitian blocks in the reduced problem.
    pub blocks: usize,
    /// Equality constraints `⟨A_α, X⟩ = f_α`, one per `α ≠ 0`.
    pub constraints: usize,
    /// The same count including the constant-term equation.
    pub constraints_with_constant: usize,
    pub status: SolveStatus,
    pub time_build: f64,
    pub time_solve: f64,
    pub solution: TsdpSolution,
}

impl SosReport {
    /// Gram matrix `bcirc(X)` of `f − bound` in the monomial basis.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        crate::tcore::bcirc(&self.solution.x)
    }
}

pub fn sos_lower_bound(
    f: &Polynomial,
    p: usize,
    opts: &SolverOptions,
) -> Result<(f64, TsdpSolution)> {
    let report = sos_report(f, p, opts)?;
    Ok((report.bound, report.solution))
}

pub fn sos_report(f: &Polynomial, p: usize, opts: &SolverOptions) -> Result<SosReport> {
    let start = Instant::now();
    let (data, problem) = build_tsdp_data(f, p)?;
    let time_build = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let solution = solve_tsdp(&problem, opts)?;
    let time_solve = start.elapsed().as_secs_f64();
    let f0 = f.coefficient(&vec![0; f.n]);
    let bound = match solution.status {
        SolveStatus::InfeasibleSuspected => f64::NEG_INFINITY,
        _ => f0 - solution.primal_obj,
    };
    Ok(SosReport {
        bound,
        p,
        basis_size: data.basis.len(),
        block_size: data.m,
        blocks: p / 2 + 1,
        constraints: data.alphas.len(),
        constraints_with_constant: data.alphas.len() + 1,
        status: solution.status,
        time_build,
        time_solve,
        solution,
    })
}

/// Relative Frobenius distance of `x` to its block-circulant projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirculantCheck {
    pub is_circulant: bool,
    pub deviation: f64,
}

/// Tests whether an `N × N` matrix is block circulant with `p × p` blocks of size `N/p`.
pub fn is_block_circulant(x: &DMatrix<f64>, p: usize, tol: f64) -> Result<CirculantCheck> {
    let size = x.nrows();
    if x.ncols() != size || p == 0 || !size.is_multiple_of(p) {
        return Err(Error::InvalidTubeSize {
            p,
            size,
            divisors: divisors(size),
        });
    }
    let m = size / p;
    let mut mean = vec![DMatrix::<f64>::zeros(m, m); p];
    for r in 0..p {
        for c in 0..p {
            mean[(r + p - c) % p] += x.view((r * m, c * m), (m, m));
        }
    }
    let mut dist = 0.0;
    for r in 0..p {
        for c in 0..p {
            let target = &mean[(r + p - c) % p] / p as f64;
            dist += (x.view((r * m, c * m), (m, m)) - target).norm_squared();
        }
    }
    let norm = x.norm();
    let deviation = if norm > 0.0 { dist.sqrt() / norm } else { 0.0 };
    Ok(CirculantCheck {
        is_circulant: deviation <= tol,
        deviation,
    })
}

/// Optimum of an affine minimization over `M(z) = M₀ + Σ z_k M_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineMinimum {
    pub value: f64,
    pub z: Vec<f64>,
    pub solution: TsdpSolution,
}

/// Dual-form problem `max −η` s.t. `C − Σ y_i A_i ⪰_T 0`, `y = (η, z)`.
fn solve_eta_dual(c: Tensor3, a: Vec<Tensor3>, opts: &SolverOptions) -> Result<AffineMinimum> {
    let mut b = vec![0.0; a.len()];
    b[0] = -1.0;
    let problem = TsdpProblem::new(c, a, b)?;
    let solution = solve_tsdp(&problem, opts)?;
    Ok(AffineMinimum {
        value: solution.y[0],
        z: solution.y[1..].to_vec(),
        solution,
    })
}

/// `min_z λ_max(M₀ + Σ z_k M_k)` over T-eigenvalues.
pub fn min_max_teigenvalue(
    m0: &Tensor3,
    ms: &[Tensor3],
    opts: &SolverOptions,
) -> Result<AffineMinimum> {
    let m0 = require_symmetric(m0)?;
    let (n, p) = (m0.m(), m0.p());
    let mut a = vec![identity(n, p).scaled(-1.0)];
    for mk in ms {
        if mk.shape() != m0.shape() {
            return Err(Error::Dimension("affine family shapes differ".into()));
        }
        a.push(require_symmetric(mk)?);
    }
    solve_eta_dual(m0.scaled(-1.0), a, opts)
}

/// `[[0, P], [Pᵀ, 0]]`.
fn dilation(p: &Tensor3) -> Result<Tensor3> {
    let (m, n, k) = p.shape();
    Tensor3::block2x2(
        &Tensor3::zeros(m, m, k),
        p,
        &p.ttranspose(),
        &Tensor3::zeros(n, n, k),
    )
}

/// `min_z ‖P₀ + Σ z_k P_k‖₂` via `[[ηI, P(z)], [P(z)ᵀ, ηI]] ⪰_T 0`.
pub fn min_spectral_norm(
    p0: &Tensor3,
    ps: &[Tensor3],
    opts: &SolverOptions,
) -> Result<AffineMinimum> {
    let (m, n, p) = p0.shape();
    let mut a = vec![identity(m + n, p).scaled(-1.0)];
    for pk in ps {
        if pk.shape() != p0.shape() {
            return Err(Error::Dimension("affine family shapes differ".into()));
        }
        a.push(dilation(pk)?.scaled(-1.0));
    }
    solve_eta_dual(dilation(p0)?, a, opts)
}

/// Constraint tensor that reads entry `(i, j, k)` of the off-diagonal block
/// of an `(m + n) × (m + n) × p` symmetric tensor.
fn offdiag_selector(m: usize, n: usize, p: usize, i: usize, j: usize, k: usize) -> Tensor3 {
    let mut e = Tensor3::zeros(m + n, m + n, p);
    e.set(i, m + j, k, 0.5);
    e.set(m + j, i, (p - k) % p, 0.5);
    e
}

/// Tensor nuclear norm as the optimum of
/// `min ½⟨I, Z⟩` s.t. `Z = [[W₁, A], [Aᵀ, W₂]] ⪰_T 0`.
///
/// The reported dual `y` reshaped to `m × n × p` is a maximizer of `⟨A, Y⟩` over
/// the spectral-norm unit ball.
pub fn nuclear_norm_tsdp(a: &Tensor3, opts: &SolverOptions) -> Result<(f64, TsdpSolution)> {
    let (m, n, p) = a.shape();
    let mut cons = Vec::with_capacity(m * n * p);
    let mut b = Vec::with_capacity(m * n * p);
    for k in 0..p {
        for j in 0..n {
            for i in 0..m {
                cons.push(offdiag_selector(m, n, p, i, j, k));
                b.push(a.get(i, j, k));
            }
        }
    }
    let problem = TsdpProblem::new(identity(m + n, p).scaled(0.5), cons, b)?;
    let sol = solve_tsdp(&problem, opts)?;
    Ok((sol.primal_obj, sol))
}

/// The dual certificate of [`nuclear_norm_tsdp`] as an `m × n × p` tensor.
pub fn nuclear_dual_certificate(shape: (usize, usize, usize), sol: &TsdpSolution) -> Tensor3 {
    let (m, n, p) = shape;
    Tensor3::from_fn(m, n, p, |i, j, k| sol.y[k * m * n + j * m + i])
}

/// `min ‖X‖_*` s.t. `⟨B_i, X⟩ = b_i`.
pub fn nuclear_norm_min_affine(
    bs: &[Tensor3],
    b: &[f64],
    shape: (usize, usize, usize),
    opts: &SolverOptions,
) -> Result<(f64, Tensor3, TsdpSolution)> {
    let (m, n, p) = shape;
    if bs.len() != b.len() {
        return Err(Error::Dimension(
            "operator and right-hand side lengths differ".into(),
        ));
    }
    let cons = bs
        .iter()
        .map(|bi| {
            if bi.shape() != shape {
                return Err(Error::Dimension(
                    "operator tensor has the wrong shape".into(),
                ));
            }
            Ok(dilation(bi)?.scaled(0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = TsdpProblem::new(identity(m + n, p).scaled(0.5), cons, b.to_vec())?;
    let sol = solve_tsdp(&problem, opts)?;
    let x = sol.x.sub_tensor(0, m, m, n);
    Ok((sol.primal_obj, x, sol))
}

/// Upper bound on `max ⟨X, A ∗ X⟩` over `x ∈ {±1}ⁿ`, where `X(i, 0, k) = x_i x_k`.
///
/// Relaxes `X ∗ Xᵀ` to a T-PSD tensor with `(i, i, 0)` entries equal to `n`.
/// The returned bound is `n·eᵀy` for the dual `Diag(y) − A ⪰_T 0`.
pub fn integer_quartic_relaxation(
    a: &Tensor3,
    opts: &SolverOptions,
) -> Result<(f64, TsdpSolution)> {
    let a = require_symmetric(a)?;
    let (n, _, p) = a.shape();
    if p != n {
        return Err(Error::Dimension(format!(
            "expected an n × n × n tensor, found {:?}",
            a.shape()
        )));
    }
    let cons = (0..n)
        .map(|i| {
            let mut e = Tensor3::zeros(n, n, n);
            e.set(i, i, 0, 1.0);
            e
        })
        .collect();
    let problem = TsdpProblem::new(a.scaled(-1.0), cons, vec![n as f64; n])?;
    let sol = solve_tsdp(&problem, opts)?;
    Ok((-sol.primal_obj, sol))
}

/// `X(i, 0, k) = x_i x_k`.
pub fn tensorize_sign_vector(x: &[f64]) -> Tensor3 {
    let n = x.len();
    Tensor3::from_fn(n, 1, n, |i, _, k| x[i] * x[k])
}

/// Exhaustive `max ⟨X, A ∗ X⟩` over sign vectors.
pub fn integer_quartic_oracle(a: &Tensor3) -> Result<f64> {
    let n = a.m();
    if n > 20 {
        return Err(Error::InvalidArgument(
            "exhaustive search limited to n ≤ 20".into(),
        ));
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 0..(1u32 << n) {
        let x: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let t = tensorize_sign_vector(&x);
        best = best.max(inner(&t, &tprod(a, &t)?)?);
    }
    Ok(best)
}

fn fourier_singular_values(a: &Tensor3) -> Vec<Vec<f64>> {
    fourier_blocks(a)
        .blocks
        .into_iter()
        .map(|b| b.singular_values().iter().copied().collect())
        .collect()
}

/// Largest singular value over all Fourier blocks.
pub fn spectral_norm_oracle(a: &Tensor3) -> f64 {
    fourier_singular_values(a)
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// `(1/p) Σ_j ‖Â_j‖_*`.
pub fn nuclear_norm_oracle(a: &Tensor3) -> f64 {
    let total: f64 = fourier_singular_values(a).iter().flatten().sum();
    total / a.p() as f64
}

/// Largest T-eigenvalue of a symmetric tensor.
pub fn max_teig_oracle(a: &Tensor3) -> Result<f64> {
    Ok(t_eigenvalues(a)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcore::bcirc;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn basis_order_and_sizes() {
        let b = monomial_basis(2, 3);
        assert_eq!(b.len(), 10);
        let expected: Vec<Exponent> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
            vec![3, 0],
            vec![2, 1],
            vec![1, 2],
            vec![0, 3],
        ];
        assert_eq!(b.exponents, expected);
        assert_eq!(
            monomial_basis(1, 2).exponents,
            vec![vec![0], vec![1], vec![2]]
        );
        assert_eq!(monomial_basis(2, 29).len(), 465);
        assert_eq!(binomial(60, 2), 1770);
    }

    #[test]
    fn parser_handles_formats_and_errors() {
        let f = Polynomial::parse("# comment\n2\n-1.5 x1^2 x2\nx2*x2\n3 x1 x1\n").unwrap();
        assert_eq!(f.n, 2);
        assert_eq!(f.coefficient(&[0, 0]), 2.0);
        assert_eq!(f.coefficient(&[2, 1]), -1.5);
        assert_eq!(f.coefficient(&[0, 2]), 1.0);
        assert_eq!(f.coefficient(&[2, 0]), 3.0);
        assert_eq!(Polynomial::parse(&f.to_text()).unwrap(), f);
        match Polynomial::parse("1\n2 y1^2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Polynomial::parse("vars 1\nx2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Polynomial::parse("x1^a").is_err());
    }

    #[test]
    fn one_variable_square_data() {
        let f = Polynomial::monomial(vec![2], 1.0);
        let (data, b) = build_sdp_data(&f).unwrap();
        assert_eq!(data.alphas, vec![vec![1], vec![2]]);
        assert_eq!(
            data.a_dense(1),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])
        );
        assert_eq!(b, vec![0.0, 1.0]);
        let (bound, _) = sos_lower_bound(&f, 1, &opts()).unwrap();
        assert!(bound.abs() < 1e-6);
    }

    #[test]
    fn gram_identities_hold_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Polynomial::monomial(vec![6, 0], 1.0);
        let (sdp, _) = build_sdp_data(&f).unwrap();
        let (tsdp, _) = build_tsdp_data(&f, 5).unwrap();
        for _ in 0..50 {
            let x = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
            let v = nalgebra::DVector::from_vec(sdp.basis.evaluate(&x));
            let outer = &v * v.transpose();
            assert!((sdp.evaluate(&x) - &outer).norm() <= 1e-10 * outer.norm());
            let xt = tsdp.folded_basis(&x);
            let prod = tprod(&xt, &xt.ttranspose()).unwrap();
            assert!((&tsdp.evaluate(&x) - &prod).norm() <= 1e-10 * prod.norm());
        }
    }

    #[test]
    fn p_one_tensor_data_equals_matrix_data() {
        let f = Polynomial::monomial(vec![4, 0], 1.0);
        let (sdp, _) = build_sdp_data(&f).unwrap();
        let (tsdp, problem) = build_tsdp_data(&f, 1).unwrap();
        assert_eq!(tsdp.alphas, sdp.alphas);
        for i in 0..sdp.alphas.len() {
            assert_eq!(problem.a[i].slice(0), &sdp.a_dense(i));
        }
        assert!(matches!(
            build_tsdp_data(&f, 4),
            Err(Error::InvalidTubeSize { size: 6, .. })
        ));
        assert!(matches!(
            build_sdp_data(&Polynomial::monomial(vec![3, 0], 1.0)),
            Err(Error::OddDegree(3))
        ));
    }

    #[test]
    fn square_of_linear_form_has_zero_bound() {
        let x = Polynomial::variable(1, 0);
        let f = x.add(&Polynomial::constant(1, -1.0)).square();
        let (bound, sol) = sos_lower_bound(&f, 1, &opts()).unwrap();
        assert!(bound.abs() < 1e-6, "{bound}");
        assert!(sol.primal_residual < 1e-7);
    }

    /// `xᵀ bcirc(G ∗ Gᵀ) x + 1/2` for a fixed integer `G`, built to admit a
    /// circulant Gram tensor at `p = 3`. Reference optima come from an
    /// independent conic solver; the true minimum from local search.
    fn circulant_instance() -> Polynomial {
        Polynomial::parse(
            "3 x1^4\n2 x1^3 x2\n-2 x1^3\n1 x1^2 x2^2\n2 x1^2 x2\n3 x1^2\n2 x1 x2^3\n4 x1 x2\n\
             2 x1\n3 x2^4\n5 x2^2\n2 x2\n3.5\n",
        )
        .unwrap()
    }

    #[test]
    fn relaxation_ordering_against_reference_values() {
        let f = circulant_instance();
        let (b1, _) = sos_lower_bound(&f, 1, &opts()).unwrap();
        let (b3, _) = sos_lower_bound(&f, 3, &opts()).unwrap();
        assert!((b1 - 3.1629185486409).abs() < 1e-6, "{b1}");
        assert!((b3 - 0.5).abs() < 1e-6, "{b3}");
        assert!(b3 <= b1 + 1e-7);
        let r2 = sos_report(&f, 2, &opts()).unwrap();
        assert_eq!(r2.status, SolveStatus::InfeasibleSuspected);
        assert_eq!(r2.bound, f64::NEG_INFINITY);
    }

    #[test]
    fn circulant_detector() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = Tensor3::random(2, 2, 5, &mut rng);
        let check = is_block_circulant(&bcirc(&t), 5, 1e-12).unwrap();
        assert!(check.is_circulant && check.deviation < 1e-15);
        let g = DMatrix::from_fn(10, 10, |_, _| rng.random_range(-1.0..1.0));
        let check = is_block_circulant(&(&g * g.transpose()), 5, 1e-6).unwrap();
        assert!(!check.is_circulant && check.deviation > 0.1);
        assert!(is_block_circulant(&g, 3, 1e-6).is_err());
    }

    #[test]
    fn oracles_on_identity_and_p_one() {
        let eye = identity(2, 3);
        assert!((spectral_norm_oracle(&eye) - 1.0).abs() < 1e-12);
        assert!((nuclear_norm_oracle(&eye) - 2.0).abs() < 1e-12);
        assert!((max_teig_oracle(&eye).unwrap() - 1.0).abs() < 1e-12);
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 4.0, 5.0]);
        let t = Tensor3::from_matrix(m.clone());
        let sv = m.singular_values();
        assert!((spectral_norm_oracle(&t) - sv.max()).abs() < 1e-12);
        assert!((nuclear_norm_oracle(&t) - sv.sum()).abs() < 1e-12);
    }

    #[test]
    fn max_teigenvalue_without_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m0 = Tensor3::random_symmetric(3, 3, &mut rng);
        let res = min_max_teigenvalue(&m0, &[], &opts()).unwrap();
        assert!((res.value - max_teig_oracle(&m0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn max_teigenvalue_one_parameter_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m0 = Tensor3::random_symmetric(2, 3, &mut rng);
        // An indefinite direction keeps the minimax finite.
        let mut m1 = Tensor3::zeros(2, 2, 3);
        m1.set(0, 0, 0, 1.0);
        m1.set(1, 1, 0, -1.0);
        let res = min_max_teigenvalue(&m0, std::slice::from_ref(&m1), &opts()).unwrap();
        assert_eq!(res.solution.status, SolveStatus::Optimal);
        let g = |z: f64| max_teig_oracle(&(&m0 + &m1.scaled(z))).unwrap();
        let best = (0..=40000)
            .map(|i| -10.0 + 20.0 * i as f64 / 40000.0)
            .map(g)
            .fold(f64::INFINITY, f64::min);
        assert!((res.value - best).abs() < 1e-4, "{} vs {best}", res.value);
        assert!(res.value >= g(res.z[0]) - 1e-6);
    }

    #[test]
    fn spectral_norm_cases() {
        let zero = Tensor3::zeros(2, 3, 2);
        assert!(min_spectral_norm(&zero, &[], &opts()).unwrap().value.abs() < 1e-7);
        let mut r1 = Tensor3::zeros(2, 2, 3);
        *r1.slice_mut(0) = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 4.0, 2.0]);
        let value = min_spectral_norm(&r1, &[], &opts()).unwrap().value;
        assert!((value - r1.slice(0).singular_values().max()).abs() < 1e-6);
    }

    #[test]
    fn nuclear_norm_small_cases() {
        let (zero, _) = nuclear_norm_tsdp(&Tensor3::zeros(2, 2, 2), &opts()).unwrap();
        assert!(zero.abs() < 1e-7);
        let (eye, _) = nuclear_norm_tsdp(&identity(2, 3), &opts()).unwrap();
        assert!((eye - 2.0).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = Tensor3::random(3, 2, 3, &mut rng);
        let (value, sol) = nuclear_norm_tsdp(&a, &opts()).unwrap();
        let oracle = nuclear_norm_oracle(&a);
        assert!((value - oracle).abs() <= 1e-5 * (1.0 + oracle));
        // Dual certificate: spectral norm at most one and attains the value.
        let y = nuclear_dual_certificate(a.shape(), &sol);
        assert!(spectral_norm_oracle(&y) <= 1.0 + 1e-6);
        assert!((inner(&a, &y).unwrap() - oracle).abs() <= 1e-5 * (1.0 + oracle));
    }

    #[test]
    fn nuclear_min_affine_grid_and_pinning() {
        let mut b1 = Tensor3::zeros(2, 2, 2);
        *b1.slice_mut(0) = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let (value, x, _) =
            nuclear_norm_min_affine(std::slice::from_ref(&b1), &[1.0], (2, 2, 2), &opts()).unwrap();
        let family = |t: f64, u: f64| {
            let mut xt = Tensor3::zeros(2, 2, 2);
            xt.set(0, 0, 0, 1.0 - 2.0 * t);
            xt.set(1, 1, 0, t);
            xt.set(0, 0, 1, u);
            nuclear_norm_oracle(&xt)
        };
        let mut grid = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                grid = grid.min(family(-1.0 + i as f64 / 200.0, -1.0 + j as f64 / 200.0));
            }
        }
        assert!((value - grid).abs() < 1e-3, "{value} vs {grid}");
        assert!((value - 1.0 / spectral_norm_oracle(&b1)).abs() < 1e-6);
        assert!((inner(&b1, &x).unwrap() - 1.0).abs() < 1e-7);

        // Constraints pinning every entry.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let x0 = Tensor3::random(2, 2, 2, &mut rng);
        let mut bs = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                for i in 0..2 {
                    let mut e = Tensor3::zeros(2, 2, 2);
                    e.set(i, j, k, 1.0);
                    bs.push(e);
                    rhs.push(x0.get(i, j, k));
                }
            }
        }
        let (value, _, _) = nuclear_norm_min_affine(&bs, &rhs, (2, 2, 2), &opts()).unwrap();
        assert!((value - nuclear_norm_oracle(&x0)).abs() < 1e-6);
        let (zero, xz, _) = nuclear_norm_min_affine(&bs, &[0.0; 8], (2, 2, 2), &opts()).unwrap();
        assert!(zero.abs() < 1e-7 && xz.max_abs() < 1e-6);
    }

    #[test]
    fn quartic_relaxation_bounds_exhaustive_optimum() {
        let (zero, _) = integer_quartic_relaxation(&Tensor3::zeros(3, 3, 3), &opts()).unwrap();
        assert!(zero.abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for n in [2, 3, 4] {
            let a = Tensor3::random_symmetric(n, n, &mut rng);
            let (bound, sol) = integer_quartic_relaxation(&a, &opts()).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            let exact = integer_quartic_oracle(&a).unwrap();
            assert!(bound >= exact - 1e-6, "n = {n}: {bound} < {exact}");
        }
        // For the identity, ⟨X, X⟩ = n² for every sign vector.
        let (bound, _) = integer_quartic_relaxation(&identity(3, 3), &opts()).unwrap();
        assert!((integer_quartic_oracle(&identity(3, 3)).unwrap() - 9.0).abs() < 1e-12);
        assert!(bound >= 9.0 - 1e-6);
    }
}
